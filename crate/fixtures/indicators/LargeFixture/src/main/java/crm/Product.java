package crm;

public class Product {
    public String id() {
        return "product";
    }
}
