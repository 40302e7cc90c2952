package io;

    import junit.framework.TestCase;

public class LoadTest extends TestCase {
        public void testRead() {
            new Reader().read(TestData.sample());
        }
    }
