package shapes;

    import junit.framework.TestCase;

public class ShapeTest extends TestCase {
        private Shape shape;

        protected void setUp() {
            shape = new Circle(1);
        }

        public void testArea() {
            assertEquals(Math.PI, shape.area(), 1e-9);
        }

        public void testPerimeter() {
            assertEquals(2 * Math.PI, shape.perimeter(), 1e-9);
        }
    }
