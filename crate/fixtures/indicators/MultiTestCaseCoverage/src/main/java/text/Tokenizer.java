package text;

public class Tokenizer {
    public String[] split(String s) {
        return s.split(" ");
    }

    public int count(String s) {
        return split(s).length;
    }
}
