public class Branches {
    public int pick(int x) {
        if (x > 0) {
            return 1;
        } else {
            // negative or zero path
            return -1;
        }
    }

    public void drain(int n) {
        do {
            n -= 1;
        } while (n > 0);
        log(n); // final value
    }
}
