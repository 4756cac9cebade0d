package org.sound;

public class Track {
    private final double[] samples;
    private String title;

    public Track(String title, double[] samples) {
        this.title = title;
        this.samples = samples;
    }

    public double sample(int frame) {
        if (frame < 0 || frame >= samples.length) {
            return 0;
        }
        return samples[frame];
    }

    // Largest absolute sample value.
    public double peak() {
        double p = 0;
        for (double s : samples) {
            p = Math.max(p, Math.abs(s));
        }
        return p;
    }

    public int length() {
        return samples.length;
    }

    public String getTitle() {
        return title;
    }

    public void setTitle(String t) {
        title = t;
    }

    public int getVal() {
        return samples.length * 2;
    }

    public int getSum() {
        return samples.length + samples.length;
    }

    public int frames() {
        return getSum() / 2;
    }
}
