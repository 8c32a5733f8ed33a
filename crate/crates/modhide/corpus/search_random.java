class search_random
{
    static volatile int sink;

    public static void main(String[] args)
    {
        int size = 100000;
        int n = size;
        if (args.length > 0) {
            n = Integer.parseInt(args[0]);
        }
        if (n > size) {
            n = size;
        }
        int[] a = new int[size];
        java.util.Random rng = new java.util.Random(98765L);
        for (int i = 0; i < n; i++) {
            int num = rng.nextInt(n);
            if (num % 2 == 0) {
                sink = a[num];
            } else {
                a[num] = 1;
            }
        }
        long sum = 0;
        for (int i = 0; i < size; i++) {
            sum = sum + a[i];
        }
        System.out.println("checksum: " + sum + " sink: " + sink);
    }
}
