package ds;

public class Deque {
    public void push(Object o) {
    }
}
