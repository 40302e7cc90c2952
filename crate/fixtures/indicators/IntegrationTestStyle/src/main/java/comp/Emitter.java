package comp;

public class Emitter {
    public void emit() {
    }
}
