package store;

    import junit.framework.TestCase;

public class InventoryTest extends TestCase {
        public void testCount() {
            Inventory inv = new Inventory(3);
            assertEquals(3, inv.count());
        }

        public void testRemove() {
            Inventory inv = new Inventory(3);
            inv.remove(1);
            assertEquals(2, inv.count());
        }
    }
