package app.report;

public class Printer {
    public String print(Object o) {
        return String.valueOf(o);
    }
}
