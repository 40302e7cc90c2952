package p;

public class Bad {
    public int two( {
        return 2
    }
