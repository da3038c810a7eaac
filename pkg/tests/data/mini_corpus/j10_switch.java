public class Dispatch {
    public int route(int code) {
        int base = 10;
        // pick a branch by code
        switch (code) {
            case 1:
                return base;
            default:
                return 0;
        }
    }
}
