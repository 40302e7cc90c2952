package ds;

    import junit.framework.TestCase;

public class QueueTest extends TestCase {
        public void testOffer() {
            new Queue().offer("x");
        }
    }
