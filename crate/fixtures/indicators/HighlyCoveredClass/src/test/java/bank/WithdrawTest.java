package bank;

    import junit.framework.TestCase;

public class WithdrawTest extends TestCase {
        public void testWithdraw() {
            new Account().withdraw(1);
        }
    }
