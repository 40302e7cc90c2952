package pkg;

public class Bar {
    private final Foo foo;

    public Bar(Foo foo) {
        this.foo = foo;
    }

    public int doubled() {
        return foo.get() * 2;
    }

    public String describe() {
        return "Bar(" + foo.get() + ")";
    }
}
