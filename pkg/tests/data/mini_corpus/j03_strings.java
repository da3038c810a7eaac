public class Literals {
    public String render() {
        String fake = "// not a comment";
        char slash = '/';
        char quote = '"';
        String block = """
            // still inside a text block
            # also not a comment
            """;
        return fake + slash + quote + block; // join them
    }
}
