package bank;

    import junit.framework.TestCase;

public class TransferTest extends TestCase {
        public void testTransfer() {
            new Account().deposit(2);
        }
    }
