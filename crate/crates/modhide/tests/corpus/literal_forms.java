class literal_forms
{
    public static void main(String[] args)
    {
        int mask = 0x1F;
        int mode = 017;
        int bits = 0b1011;
        int big = 1_000_000;
        long stamp = 86400L;
        double rate = 0.25;
        float gain = 1.5f;
        int plain = 365;
        System.out.println(mask + mode + bits + big + stamp + rate + gain + plain);
    }
}
