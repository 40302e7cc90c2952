package calc;

    import junit.framework.TestCase;

public class MatrixTest extends TestCase {
        public void testRows() {
            assertEquals(0, new Matrix().rows());
        }
    }
