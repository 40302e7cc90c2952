package crm;

public class Invoice {
    public String id() {
        return "invoice";
    }
}
