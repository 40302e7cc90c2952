package shop;

public class Cart {
    private int items;

    public void add(String sku) {
        items++;
    }

    public int size() {
        return items;
    }
}
