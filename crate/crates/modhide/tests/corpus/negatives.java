class negatives
{
    public static void main(String[] args)
    {
        int depth = -40;
        int floor = depth - 25;
        int span = (-6) + 50;
        int gap = -(-12) + floor;
        System.out.println(depth + floor + span + gap);
    }
}
