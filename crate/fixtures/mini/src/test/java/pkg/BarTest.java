package pkg;

import junit.framework.TestCase;

public class BarTest extends TestCase {
    private Bar bar;

    protected void setUp() {
        bar = new Bar(Samples.counterAt(4));
    }

    public void testDoubled() {
        assertEquals(8, bar.doubled());
    }

    public void testDescribe() {
        assertEquals("Bar(4)", bar.describe());
    }

    protected void tearDown() {
        bar = null;
    }
}
