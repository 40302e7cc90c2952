package org.apache.tools.ant;

public class Project {
    public void init() {
    }

    public void setBaseDir(String dir) {
    }

    public void executeTarget(String name) {
    }

    public String getProperty(String name) {
        return null;
    }
}
