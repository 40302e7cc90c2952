package crm;

public class Customer {
    public String id() {
        return "customer";
    }
}
