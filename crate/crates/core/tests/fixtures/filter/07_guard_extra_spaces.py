import smach


class Greet(smach.StateMachine):
    def __init__(self, robot):
        smach.StateMachine.__init__(self, outcomes=["done"])
        with self:
            smach.StateMachine.add("SAY", Say(robot, "hi"), transitions={"spoken": "done"})

if   __name__ == "__main__":
    main()
