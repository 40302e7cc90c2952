package flow;

    import junit.framework.TestCase;

public class PipelineTest extends TestCase {
        private Pipeline pipeline;

        protected void setUp() {
            pipeline = new Pipeline();
        }

        public void testEverything() {
            pipeline.open();
            pipeline.configure();
            pipeline.load();
            pipeline.validate();
            pipeline.transform();
            pipeline.enrich();
            pipeline.aggregate();
            pipeline.store();
            pipeline.report();
            pipeline.close();
        }

        public void testLoadCycle() {
            pipeline.open();
            pipeline.load();
            pipeline.validate();
            pipeline.store();
            pipeline.close();
        }
    }
