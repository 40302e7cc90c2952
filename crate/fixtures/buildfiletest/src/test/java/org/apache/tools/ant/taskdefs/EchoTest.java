package org.apache.tools.ant.taskdefs;

import org.apache.tools.ant.BuildFileTest;

public class EchoTest extends BuildFileTest {
    public EchoTest(String name) {
        super(name);
    }

    public void setUp() {
        configureProject("src/etc/testcases/taskdefs/echo.xml");
    }

    public void testBasic() {
        executeTarget("basic");
    }

    public void testNested() {
        executeTarget("nested");
    }

    public void testFailure() {
        expectPropertySet("failure", "done");
    }

    public void testVerbose() {
        executeTarget("verbose");
    }

    public void testCleanup() {
        executeTarget("cleanup");
    }

    public void testEmpty() {
        expectPropertySet("empty", "done");
    }
}
