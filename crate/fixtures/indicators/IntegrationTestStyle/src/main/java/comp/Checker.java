package comp;

public class Checker {
    public void check() {
    }
}
