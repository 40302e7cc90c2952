package io;

public class Reader {
    public String read(String name) {
        return name;
    }
}
