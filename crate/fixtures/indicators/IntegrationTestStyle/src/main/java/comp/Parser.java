package comp;

public class Parser {
    public void parse() {
    }
}
