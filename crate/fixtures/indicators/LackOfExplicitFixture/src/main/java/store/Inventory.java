package store;

public class Inventory {
    private int count;

    public Inventory(int count) {
        this.count = count;
    }

    public int count() {
        return count;
    }

    public void remove(int n) {
        count -= n;
    }
}
