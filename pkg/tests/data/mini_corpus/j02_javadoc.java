public class Greeter {
    /** Returns a greeting for the given name. */
    public String greet(String name) {
        String prefix = "Hello, ";
        /* fall back to a generic greeting */
        return prefix + name;
    }
    /**
     * Multi-line javadoc block.
     * @param x ignored
     */
    public void noop(int x) {
        /**/
        x = x;
    }
}
