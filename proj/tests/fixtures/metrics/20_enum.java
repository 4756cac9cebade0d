public enum Level {
    LOW(1),
    HIGH(10);

    private final int weight;

    Level(int weight) {
        this.weight = weight;
    }

    public boolean above(Level other) {
        return weight > other.weight;
    }
}
