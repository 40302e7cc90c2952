package coll;

public class Stack {
    private Object[] items = new Object[16];
    private int top;

    public void push(Object o) {
        items[top++] = o;
    }

    public Object pop() {
        return items[--top];
    }

    public boolean isEmpty() {
        return top == 0;
    }
}
