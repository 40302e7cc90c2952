package coll;

public class Bag {
    public int size() {
        return 0;
    }
}
