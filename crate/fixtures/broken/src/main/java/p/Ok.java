package p;

public class Ok {
    public int one() {
        return 1;
    }
}
