package app.core;

public class Engine {
    public boolean run() {
        return true;
    }
}
