package pkg;

public class Baz {
    public int ping() {
        return 1;
    }
}
