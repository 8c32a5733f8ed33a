class already_normalized
{
    public static void main(String[] args)
    {
        int tally = 0;
        int i = 0;
        while (i < 8) {
            tally = tally + i;
            i++;
        }
        System.out.println(tally);
    }
}
