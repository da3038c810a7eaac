public class Unclear {

    // floating note with no adjacent code

    public void load(String path) {
        checkAccess(path);

        // describe a continued call
        parse(path,
              true,
              0);
    }
}
