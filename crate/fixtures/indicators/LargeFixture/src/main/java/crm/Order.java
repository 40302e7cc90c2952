package crm;

public class Order {
    public String id() {
        return "order";
    }
}
