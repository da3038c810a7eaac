public class Blocks {
    public void fill() {
        prepare();
        /* explain the next line
         * in two comment lines
         */
        buffer.clear();
        /* reset */ cursor = 0;
    }
}
