package calc;

public class Matrix {
    public int rows() { return 0; }
    public int cols() { return 0; }
    public Matrix transpose() { return this; }
    public Matrix times(Matrix o) { return this; }
    public double det() { return 0; }
    public double trace() { return 0; }
}
