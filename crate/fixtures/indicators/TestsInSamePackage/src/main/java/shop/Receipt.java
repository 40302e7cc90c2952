package shop;

public class Receipt {
    public String render() {
        return "";
    }
}
