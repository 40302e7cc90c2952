package pkg.util;

public final class Strings {
    private Strings() {
    }

    public static String pad(String s, int width) {
        StringBuilder b = new StringBuilder(s);
        while (b.length() < width) {
            b.append(' ');
        }
        return b.toString();
    }
}
