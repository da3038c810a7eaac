public class Counter {
    private int value = 0; // current tally

    public void bump() {
        int step = 1;
        // apply the step
        value += step;
    }
}
