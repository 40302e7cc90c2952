package crm;

    import junit.framework.TestCase;

public class CrmTest extends TestCase {
        private Customer customer;
        private Order order;
        private Product product;
        private Invoice invoice;

        protected void setUp() {
            customer = new Customer();
            order = new Order();
            product = new Product();
            invoice = new Invoice();
        }

        public void testCustomer() {
            assertEquals("customer", customer.id());
        }

        public void testOrder() {
            assertEquals("order", order.id());
        }

        public void testProduct() {
            assertEquals("product", product.id());
        }

        public void testInvoice() {
            assertEquals("invoice", invoice.id());
        }
    }
