class Stack {
    private int[] items = new int[8];
    private int size;

    void push(int v) {
        grow();
        items[size++] = v;
    }

    int pop() {
        return items[--size];
    }

    void grow() {
        if (size == items.length) {
            items = java.util.Arrays.copyOf(items, size * 2);
        }
    }

    void pushAll(int a, int b) {
        push(a);
        push(b);
        System.out.println(pop());
    }
}
