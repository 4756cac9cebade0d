package com.acme.images;

import java.io.File;
import java.io.IOException;
import java.util.HashMap;
import java.util.Map;

/**
 * Loads image bytes from disk and keeps them in memory.
 */
public class ImageLoader {
    private final Map<String, byte[]> cache = new HashMap<>();
    private final File root;
    private int hits;
    private int misses;

    public ImageLoader(File root) {
        this.root = root;
    }

    public byte[] load(String name) throws IOException {
        if (name == null || name.isEmpty()) {
            throw new IOException("empty name");
        }
        byte[] data = cache.get(name);
        if (data != null) {
            hits++;
            return data;
        }
        misses++;
        data = read(new File(root, name));
        cache.put(name, data);
        return data;
    }

    private byte[] read(File f) throws IOException {
        return java.nio.file.Files.readAllBytes(f.toPath());
    }

    /**
     * Drops every cached image.
     */
    public void clear() {
        cache.clear();
    }

    public double hitRatio() {
        int total = hits + misses;
        return total == 0 ? 0.0 : (double) hits / total;
    }

    public int cached() {
        return cache.size();
    }

    public int getHits() {
        return hits;
    }

    public int getMisses() {
        return misses;
    }

    public void evict(String name) {
        if (name != null && cache.containsKey(name)) {
            cache.remove(name);
        }
    }
}
