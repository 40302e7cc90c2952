package app.report;

public class Layout {
    public int width() {
        return 80;
    }
}
