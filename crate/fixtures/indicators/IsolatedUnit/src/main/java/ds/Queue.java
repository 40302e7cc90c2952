package ds;

public class Queue {
    public void offer(Object o) {
    }
}
