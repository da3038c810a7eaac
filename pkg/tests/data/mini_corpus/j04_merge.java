public class Merge {
    public void run() {
        // first paragraph line one
        // first paragraph line two
        step();

        // separated by the blank line above
        step();
        int x = 0;
            // indented differently from the next
        // so these two do not merge
        step();
    }
}
