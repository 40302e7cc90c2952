package io;

public class TestData {
    public static String sample() {
        return "sample.txt";
    }
}
