package bank;

    import junit.framework.TestCase;

public class AccountTest extends TestCase {
        public void testAccount() {
            new Account().balance();
        }
    }
