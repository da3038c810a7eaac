public class Service {
    private String name = "svc"; // short identifier

    public void start() {
        // boot sequence begins here
        init();
        warmup();
    }
}
