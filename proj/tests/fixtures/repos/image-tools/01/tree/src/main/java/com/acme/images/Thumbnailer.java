package com.acme.images;

import java.util.ArrayList;
import java.util.List;

public class Thumbnailer {
    private final ImageLoader loader;
    private int width = 64;
    private int height = 64;

    public Thumbnailer(ImageLoader loader) {
        this.loader = loader;
    }

    public int area() {
        return width * height;
    }

    public List<String> batch(List<String> names) {
        List<String> out = new ArrayList<>();
        for (String n : names) {
            out.add(n + "@" + width + "x" + height);
        }
        return out;
    }

    public int scaled(int size) {
        int factor = computeVal(size);
        return size / factor;
    }

    private int computeVal(int size) {
        return size > width ? size / width : 1;
    }

    public String describe() {
        return "thumb " + width + "x" + height;
    }
}
