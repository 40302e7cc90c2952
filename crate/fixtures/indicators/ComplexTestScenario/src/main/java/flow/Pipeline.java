package flow;

public class Pipeline {
    public void open() {}
    public void configure() {}
    public void load() {}
    public void validate() {}
    public void transform() {}
    public void enrich() {}
    public void aggregate() {}
    public void store() {}
    public void report() {}
    public void close() {}
}
