public class Loops {
    public int sum(int[] xs) {
        int total = 0;

        // add every element
        for (int i = 0; i < xs.length; i++) {
            if (xs[i] > 0) {
                total += xs[i];
            }
        }
        while (total > 100) {
            // shrink until small enough
            total -= 10;
        }
        return total;
    }
}
