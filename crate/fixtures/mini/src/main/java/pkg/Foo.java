package pkg;

/** A counter with a bounded history. */
public class Foo {
    private int value;
    private int[] history = new int[8];

    public Foo() {
        value = 0;
    }

    public void add(int amount) {
        record(value);
        value += amount;
    }

    public int get() {
        return value;
    }

    public void reset() {
        value = 0;
    }

    private void record(int old) {
        history[old % history.length] = old;
    }
}
