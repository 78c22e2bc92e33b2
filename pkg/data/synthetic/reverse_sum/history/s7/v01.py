n = int(input())
print("Reverse:", int(str(n)[::-1]))
print("Sum:", n + int(str(n)[::-1]))
